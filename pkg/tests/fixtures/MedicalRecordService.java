import java.sql.Connection;
import java.sql.DriverManager;
import java.sql.ResultSet;
import java.sql.Statement;

public class MedicalRecordService {

    private static final String DB_URL = "jdbc:mysql://prod-db:3306/medical";
    private static final String DB_USER = "records_admin";
    private static final String DB_PASSWORD = "sup3rS3cretPw";

    public String retrieveRecord(String patientId) {
        String query = "SELECT record FROM records WHERE patient_id = '" + patientId + "'";
        try {
            Connection conn = DriverManager.getConnection(DB_URL, DB_USER, DB_PASSWORD);
            Statement stmt = conn.createStatement();
            ResultSet rs = stmt.executeQuery(query);
            if (rs.next()) {
                return rs.getString("record");
            }
            throw new RuntimeException("No record found for patient: " + patientId);
        } catch (RuntimeException e) {
            System.out.println("Record lookup failed for patient: " + patientId);
            throw new RuntimeException("Unable to retrieve record for " + patientId, e);
        }
    }

    public static void main(String[] args) {
        MedicalRecordService service = new MedicalRecordService();
        service.retrieveRecord("patient_112233");
    }
}
